from .config import DetectorConfig, DetectorFactory, ExperimentConfig
from .session import Session, exits_on_error
from .app import app
