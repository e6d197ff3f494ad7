from src.modules.training.losses import *
from src.modules.training.optim import *
from src.modules.training.router import *
from src.modules.training.schemas import *
from src.modules.training.service import *
