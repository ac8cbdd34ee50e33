from .correlate import (
    ElementwiseOp,
    correlate,
    correlate_input_grad,
    correlate_kernel_grad,
    correlate_raw,
    elementwise,
    window_max,
)
from .grad_check import grad_check
from .tape import GradTape

__all__ = [
    'ElementwiseOp',
    'GradTape',
    'correlate',
    'correlate_input_grad',
    'correlate_kernel_grad',
    'correlate_raw',
    'elementwise',
    'grad_check',
    'window_max',
]
