# application/dto/edge_field_request_dto.py

from typing import List, Optional, Union

from pydantic import BaseModel

from common.config import settings


class EdgeFieldRequestDTO(BaseModel):
    # rows of gray values, or rows of [r, g, b]
    image: List[List[Union[float, List[float]]]]
    preset: str = settings.default_preset
    tau: Optional[float] = None
