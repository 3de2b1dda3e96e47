from .history import FRAME_DIM, HISTORY_LEN, POLICY_INPUT_DIM, ObservationHistory, assemble_policy_input
from .gae import gae, normalize_advantages
from .env import VecGaitEnv, ACTION_SCALE, ACTION_CLIP
from .trainer import PpoConfig, Trainer, ActorCritic

__all__ = [
    "FRAME_DIM",
    "HISTORY_LEN",
    "POLICY_INPUT_DIM",
    "ObservationHistory",
    "assemble_policy_input",
    "gae",
    "normalize_advantages",
    "VecGaitEnv",
    "ACTION_SCALE",
    "ACTION_CLIP",
    "PpoConfig",
    "Trainer",
    "ActorCritic",
]
