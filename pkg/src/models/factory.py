"""
Model Factory
=============

Registry of SFDE models selectable by name in experiment configs.
"""

import logging
from typing import Dict, List, Type

from ..core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Registry of available models
_MODELS: Dict[str, Type] = {}


def register_model(name: str):
    """Decorator to register a model class."""
    def decorator(cls: Type):
        _MODELS[name.lower()] = cls
        return cls
    return decorator


def get_model(name: str, **kwargs):
    """
    Get a model instance by registry name.

    Args:
        name: Model name (e.g., 'benchmark2d')
        **kwargs: Constructor overrides (box, delay, history)

    Raises:
        ConfigurationError: If the name is not registered
    """
    name_lower = name.lower()

    if name_lower not in _MODELS:
        # Built-in models register on import
        from . import benchmark  # noqa: F401

    model_class = _MODELS.get(name_lower)
    if model_class is None:
        raise ConfigurationError(
            f"Unknown model: {name}. Available: {', '.join(list_models())}",
            config_key="model",
        )
    logger.debug(f"Creating model '{name_lower}'")
    return model_class(**kwargs)


def list_models() -> List[str]:
    """List registered model names."""
    from . import benchmark  # noqa: F401

    return sorted(_MODELS)
