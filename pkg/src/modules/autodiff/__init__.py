from src.modules.autodiff.checkpoint import *
from src.modules.autodiff.gradcheck import *
from src.modules.autodiff.ops import *
from src.modules.autodiff.schemas import *
from src.modules.autodiff.tensor import *
