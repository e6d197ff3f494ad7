from src.modules.slice_conv.reference import *
from src.modules.slice_conv.schemas import *
from src.modules.slice_conv.service import *
