from .singleton import SingletonMeta
from .global_context import GlobalContext
from .errors import *
from .utils import derive_seed, ensure_finite, exact_mean, hash_dict, standard_error
from .transferables import Transferable, Transferables, dict_to_object, object_to_dict
