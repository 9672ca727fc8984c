from __future__ import annotations

import importlib
import inspect
import json
from typing import TypeVar, get_args, get_origin

import numpy as np
from docstring_parser import parse
from pydantic import BaseModel

from .singleton import SingletonMeta
from .utils import hash_dict

T = TypeVar("T")


class Transferable:
    """Mixin that records the constructor arguments of a class so the object can be rebuilt.

    Subclasses are registered in `Transferables()` by class name. An object serializes to
    `{"datatype": <class name>, "data": {<init argument>: <encoded value>}}` and is rebuilt through
    `Transferables().to_object`.
    """

    name: str = __name__
    base_type: type[Transferable] | None = None
    metadata: dict | None = None

    def __init_subclass__(
        cls: type[Transferable],
        is_base_type: bool = False,
        **kwargs,
    ):
        """Registers the class and wraps its __init__ to record the init parameters.

        Args:
            is_base_type (bool, optional): Whether the class is a base type, e.g. `Detector`. Defaults to False.
        """
        super().__init_subclass__(**kwargs)

        Transferables().add_transferable(cls, is_base_type=is_base_type)

        _original_init = cls.__init__
        _signature = inspect.signature(_original_init)

        def _init(self: Transferable, *args, **obj_kwargs):
            # only the outermost __init__ records parameters,
            # super().__init__ calls keep them
            if not hasattr(self, "_dict_params"):
                bound = _signature.bind(self, *args, **obj_kwargs)
                params = {}
                for key, value in list(bound.arguments.items())[1:]:
                    kind = _signature.parameters[key].kind
                    if kind is inspect.Parameter.VAR_KEYWORD:
                        params |= value
                    elif kind is not inspect.Parameter.VAR_POSITIONAL:
                        params[key] = value
                self._dict_params = params
                self.datatype = type(self).__name__
            _original_init(self, *args, **obj_kwargs)

        _init.__doc__ = _original_init.__doc__
        _init.__signature__ = _signature
        cls.__init__ = _init

    @classmethod
    def init_from_dict(
        cls, obj_dict: dict[str, any], **additional_kwargs
    ) -> Transferable:
        """Initialize the object from its dict representation.

        Args:
            obj_dict (dict[str, any]): dict with the keys `datatype` and `data`
            additional_kwargs (dict[str, any]): arguments that replace recorded ones

        Returns:
            Transferable: initialized object
        """
        return cls(
            **{key: dict_to_object(arg) for key, arg in obj_dict["data"].items()}
            | additional_kwargs
        )

    def dict(self, exclude_keys: list[str] | None = None) -> dict[str, any]:
        """Returns a dict representation of the object with the init parameters.

        Args:
            exclude_keys (list[str] | None, optional): keys to exclude from the dict. Defaults to None.

        Returns:
            dict[str, any]: dict representation of the object with the init parameters
        """
        return {
            "datatype": self.datatype,
            "data": {
                k: object_to_dict(v)
                for k, v in self._dict_params.items()
                if not exclude_keys or k not in exclude_keys
            },
        }

    def json(self, exclude_keys: list[str] | None = None) -> str:
        return json.dumps(self.dict(exclude_keys=exclude_keys))

    def clone(self: T, **overrides) -> T:
        """Builds a fresh object from the recorded init parameters.

        Args:
            **overrides: init parameters to replace, e.g. `threshold=2.0`

        Returns:
            Transferable: a new, unused object of the same type
        """
        return type(self)(**(self._dict_params | overrides))

    @property
    def init_parameters(self) -> dict[str, any]:
        return dict(self._dict_params)

    def initialization_hash(self, exclude_keys: list[str] | None = None) -> str:
        """Returns a hash of the initialization parameters of the object."""
        return hash_dict(self.dict(exclude_keys=exclude_keys))

    @classmethod
    def info(cls) -> dict:
        """Returns name, base type and documented constructor arguments of the class."""
        return {
            "name": cls.name,
            "base_type": cls.base_type.__name__ if cls.base_type else None,
        } | (cls.metadata or {})


class Transferables(metaclass=SingletonMeta):
    _transferables: dict[str, type[Transferable]] = {}

    def add_transferable(
        self, cls: type[Transferable], is_base_type: bool = False
    ) -> None:
        """Add a transferable class to the registry.

        Args:
            cls (type[Transferable]): class to add
            is_base_type (bool, optional): whether the class is a base type. Defaults to False.

        Raises:
            KeyError: if another class with the same name is already registered
        """
        existing = self._transferables.get(cls.__name__)
        if existing is not None and existing.__module__ != cls.__module__:
            raise KeyError(f"The key {cls.__name__} already exists.")

        if is_base_type:
            base_type_ = None
        else:
            for class_ in cls.__mro__[1:]:
                if class_ in self.base_types:
                    base_type_ = class_
                    break
            else:
                base_type_ = None

        cls.name = cls.__name__
        cls.base_type = base_type_
        cls.metadata = _argument_metadata(cls)
        self._transferables[cls.__name__] = cls

    def __getitem__(self, item: type | str) -> type[Transferable]:
        return self._transferables[item.__name__ if isinstance(item, type) else item]

    def __contains__(self, item: type | str) -> bool:
        name = item.__name__ if isinstance(item, type) else item
        return name in self._transferables

    @property
    def base_types(self) -> list[type]:
        return [v for v in self._transferables.values() if v.base_type is None]

    def to_object(
        self,
        json_data: dict,
        base_type: type[T] | None = None,
        **additional_kwargs: any,
    ) -> T | Transferable:
        """Converts a dict representation back to an object.

        Args:
            json_data (dict): dict to convert
            base_type (type | None, optional): expected base type of the object. Defaults to None.
            **additional_kwargs (any): additional keyword arguments to pass to the object's init method

        Raises:
            ValueError: if the datatype is not registered
            TypeError: if the base type does not match the object's base type
        """
        datatype_string: str = json_data["datatype"]
        if datatype_string not in self:
            raise ValueError(f"Datatype {datatype_string} is not registered.")

        datatype = self[datatype_string]
        if base_type is not None and not issubclass(datatype, base_type):
            raise TypeError(
                f"Expected object of base type '{base_type.__name__}', got '{datatype_string}'."
            )
        return datatype.init_from_dict(json_data, **additional_kwargs)

    def overview(self, of_type: type | None = None) -> dict[str, dict]:
        """Returns information about registered classes, optionally only subclasses of `of_type`."""
        return {
            k: v.info()
            for k, v in self._transferables.items()
            if of_type is None or (issubclass(v, of_type) and v is not of_type)
        }


def _argument_metadata(type_: type) -> dict:
    """Parses the __init__ signature and docstring of a class into argument descriptions."""
    signature = inspect.signature(type_.__init__)
    doc = inspect.getdoc(type_.__init__)
    parsed = parse(doc) if doc else None
    descriptions = {p.arg_name: p.description for p in parsed.params} if parsed else {}

    required_args, optional_args = {}, {}
    for param_name, param in signature.parameters.items():
        if param_name in ("self", "args", "kwargs"):
            continue
        entry = {
            "type": _type_name(param.annotation),
            "description": descriptions.get(param_name),
        }
        if param.default is inspect.Parameter.empty:
            required_args[param_name] = entry
        else:
            optional_args[param_name] = entry | {"default": repr(param.default)}

    return {
        "description": parsed.short_description if parsed else None,
        "required_args": required_args,
        "optional_args": optional_args,
    }


def _type_name(annotation) -> str:
    if annotation is inspect.Parameter.empty:
        return "any"
    if isinstance(annotation, str):
        return annotation
    origin = get_origin(annotation)
    if origin is not None:
        origin_name = getattr(origin, "__name__", str(origin))
        args = ", ".join(_type_name(a) for a in get_args(annotation))
        return f"{origin_name}[{args}]"
    return getattr(annotation, "__name__", str(annotation))


def object_to_dict(obj) -> dict[str, any]:
    """Converts an object to a dictionary with explicit datatypes.

    Args:
        obj (Any): The object to be converted to a dictionary.

    Returns:
        dict[str, any]: A dictionary representation of the object.

    Raises:
        TypeError: If the object is not of a supported type.
    """
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()

    _dict = {"datatype": type(obj).__name__}

    if isinstance(obj, (bool, int, float, str)):
        _dict["value"] = obj
    elif obj is None:
        _dict["value"] = "none"
    elif isinstance(obj, (list, tuple)):
        _dict["value"] = [object_to_dict(item) for item in obj]
    elif isinstance(obj, dict):
        _dict["value"] = {key: object_to_dict(value) for key, value in obj.items()}
    elif type(obj) in Transferables():
        _dict["datatype"] = obj.datatype
        _dict["value"] = obj.dict()
    elif isinstance(obj, BaseModel):
        _dict["datatype"] = "pydantic"
        _dict["value"] = {
            "model": f"{type(obj).__module__}:{type(obj).__qualname__}",
            "data": obj.model_dump(mode="json"),
        }
    else:
        raise TypeError(
            f"{type(obj).__name__} is not a registered class or in [int, float, str, bool, None, list, tuple, dict]"
        )

    return _dict


def dict_to_object(object_dict: dict) -> any:
    """Inverse of `object_to_dict`.

    Args:
        object_dict (dict): The dictionary to be converted to an object.

    Returns:
        object: An object with the correct types.

    Raises:
        TypeError: If the data type specified in the dictionary is not supported.
    """
    if (
        not isinstance(object_dict, dict)
        or not {"value", "datatype"} <= object_dict.keys()
    ):
        raise TypeError("Not a valid json type")

    value = object_dict["value"]
    type_name = object_dict["datatype"]

    if type_name == "int":
        return int(value)
    elif type_name == "float":
        return float(value)
    elif type_name == "str":
        return str(value)
    elif type_name == "bool":
        return bool(value)
    elif type_name == "NoneType":
        return None
    elif type_name == "list":
        return [dict_to_object(item) for item in value]
    elif type_name == "tuple":
        return tuple(dict_to_object(item) for item in value)
    elif type_name == "dict":
        return {key: dict_to_object(v) for key, v in value.items()}
    elif type_name in Transferables():
        return Transferables().to_object(value)
    elif type_name == "pydantic":
        module_name, qualname = value["model"].split(":")
        model = getattr(importlib.import_module(module_name), qualname)
        return model.model_validate(value["data"])
    else:
        raise TypeError("Unsupported data type: {}".format(type_name))
