"""Модуль для констант."""

# MARK: Classes
N_CLASSES: int = 5
BACKGROUND_CLASS: int = 0
LANE_CLASSES: tuple[int, ...] = (1, 2, 3, 4)
# Фон черный, классы 1–4: синий, зеленый, красный, желтый.
CLASS_PALETTE: tuple[tuple[int, int, int], ...] = (
    (0, 0, 0),
    (0, 0, 255),
    (0, 255, 0),
    (255, 0, 0),
    (255, 255, 0),
)
# Зеркальное отражение меняет сторону полосы относительно эго.
HFLIP_CLASS_MAP: tuple[int, ...] = (0, 4, 3, 2, 1)

# MARK: Checkpoint
CHECKPOINT_MAGIC: bytes = b"SANC"
CHECKPOINT_VERSION: int = 1

# MARK: Events
EVENTS_MAGIC: bytes = b"DVE1"
EVENTS_CSV_HEADER: str = "t_us,x,y,p"
DEFAULT_DT_US: int = 30_000
DEFAULT_CLIP: int = 3

# MARK: Lanes
DEFAULT_LANE_WIDTH_PX: int = 20

# MARK: Network
OUTPUT_STRIDE: int = 4
MIN_INPUT_EXTENT: int = 8
DEFAULT_STAGE_CHANNELS: tuple[int, ...] = (16, 32, 64)
MSC_INIT_SCALE: float = 0.01
EXTRA_CONV_LAYERS: int = 8

# MARK: Training
DEFAULT_EVAL_INTERVAL: int = 100
SPLIT_FRACTIONS: tuple[tuple[str, float], ...] = (
    ("train", 1 / 2),
    ("val", 1 / 6),
    ("test", 1 / 3),
)
ABLATION_SEEDS: int = 3

# MARK: PRNG
PRNG_NAME: str = "xorshift64star-v1"
