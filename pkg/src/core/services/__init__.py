from src.core.services.hash_service import *
from src.core.services.manifest_service import *
from src.core.services.rng_service import *
