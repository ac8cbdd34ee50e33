# application/dto/edge_field_response_dto.py

from typing import List

from pydantic import BaseModel


class EdgeFieldResponseDTO(BaseModel):
    values: List[List[float]]
    e_edge: float
    e_max: float
    tau: float
