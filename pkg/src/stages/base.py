"""
🧩 Base Stage Class
"""

from abc import ABC, abstractmethod
from typing import Generic, TypeVar

from rich.console import Console

from ..config import settings

T = TypeVar("T")

# stdout 은 CLI 결과 표 전용
console = Console(stderr=True)


class BaseStage(ABC, Generic[T]):
    """Base class for all trial stages"""

    @property
    @abstractmethod
    def name(self) -> str:
        """Stage name"""
        pass

    @abstractmethod
    def run(self, *args, **kwargs) -> T:
        """Execute the stage's main task"""
        pass

    def log(self, message: str) -> None:
        """Log a message"""
        if settings.verbose:
            console.print(f"[{self.name}] {message}", markup=False)
