__version__ = "0.1.0"

from .graph_core import Basis, Graph, System, Universe, make_graph
from .restrictions import Restriction
from .state_algebra import Ket, OperatorMatrix
