# methods/factory.py
from methods.base import BaseMethod
from methods.baseline import BaselineMethod
from methods.centsimple import CentSimpleMethod
from methods.centsmoothie import CentSmoothieMethod

METHOD_CLASSES: dict[str, type[BaseMethod]] = {
    "centsmoothie": CentSmoothieMethod,
    "centsimple": CentSimpleMethod,
    "baseline": BaselineMethod,
}


def make_method(name: str, eps: float = 1e-8) -> BaseMethod:
    try:
        return METHOD_CLASSES[name](eps=eps)
    except KeyError:
        raise ValueError(f"unknown method {name!r}; expected one of {tuple(METHOD_CLASSES)}") from None
