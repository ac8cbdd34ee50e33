# application/dto/evaluate_request_dto.py

from typing import List, Optional

from pydantic import BaseModel


class EvaluateRequestDTO(BaseModel):
    prediction: List[List[float]]
    ground_truth: List[List[float]]
    min_depth: Optional[float] = None
