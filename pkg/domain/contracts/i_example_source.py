# domain/contracts/i_example_source.py

from abc import ABC, abstractmethod
from typing import List

from domain.entities.training_example import TrainingExample


class IExampleSource(ABC):
    """Supplies the training examples of one epoch."""

    @abstractmethod
    def __len__(self) -> int:
        ...

    @abstractmethod
    def epoch_examples(self, epoch: int) -> List[TrainingExample]:
        """Examples for `epoch`; static sources return the same list every time."""
