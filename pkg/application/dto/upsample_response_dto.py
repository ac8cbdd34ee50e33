# application/dto/upsample_response_dto.py

from typing import List

from pydantic import BaseModel


class UpsampleResponseDTO(BaseModel):
    depth: List[List[float]]
    confidence: List[List[float]]
    kind: str
