from .i_example_source import IExampleSource
from .i_guided_layer import IGuidedLayer, LayerGrads
from .i_raster_store import IRasterStore

__all__ = ['IExampleSource', 'IGuidedLayer', 'IRasterStore', 'LayerGrads']
