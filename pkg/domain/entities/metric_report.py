# domain/entities/metric_report.py

from typing import ClassVar, List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

# Floating slack for rmse >= mae when every error has the same magnitude
_ORDER_SLACK = 1e-9


class MetricReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    CSV_HEADER: ClassVar[Tuple[str, ...]] = (
        "mae", "rmse", "imae", "irmse", "delta1", "delta2", "delta3",
    )

    mae: float
    rmse: float
    imae: float
    irmse: float
    delta1: float
    delta2: float
    delta3: float

    @model_validator(mode="after")
    def _check_order(self) -> "MetricReport":
        if not 0.0 <= self.delta1 <= self.delta2 <= self.delta3 <= 1.0:
            raise ValueError(f"inlier ratios out of order: {self.delta1}, {self.delta2}, {self.delta3}")
        if self.mae < 0 or self.rmse < self.mae * (1.0 - _ORDER_SLACK):
            raise ValueError(f"need rmse >= mae >= 0, got rmse={self.rmse} mae={self.mae}")
        return self

    def as_row(self) -> List[float]:
        return [getattr(self, name) for name in self.CSV_HEADER]

    @classmethod
    def mean(cls, reports: List["MetricReport"]) -> "MetricReport":
        if not reports:
            raise ValueError("cannot average an empty list of reports")
        n = float(len(reports))
        return cls(**{name: sum(getattr(r, name) for r in reports) / n for name in cls.CSV_HEADER})
