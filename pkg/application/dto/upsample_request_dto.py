# application/dto/upsample_request_dto.py

from typing import List, Optional

from pydantic import BaseModel


class UpsampleRequestDTO(BaseModel):
    # file name inside the server's checkpoint directory
    checkpoint: Optional[str] = None
    sparse_depth: List[List[float]]
    confidence: List[List[float]]
    edge_dist: Optional[List[List[float]]] = None
