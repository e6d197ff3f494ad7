from src.modules.dvs.codec import *
from src.modules.dvs.router import *
from src.modules.dvs.schemas import *
from src.modules.dvs.service import *
