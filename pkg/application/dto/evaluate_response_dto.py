# application/dto/evaluate_response_dto.py

from pydantic import BaseModel


class EvaluateResponseDTO(BaseModel):
    mae: float
    rmse: float
    imae: float
    irmse: float
    delta1: float
    delta2: float
    delta3: float
