"""Exception types raised by the simulator and the learners."""

from typing import Optional


class ConfigError(ValueError):
    """Invalid or inconsistent configuration; the message names the offending key."""


class PlacementError(ConfigError):
    """The UAV deployment could not satisfy the region and separation constraints."""


class GeometryError(ValueError):
    """Degenerate geometry: coincident points, zero distances or mismatched dimensions."""


class CheckpointError(ValueError):
    """A checkpoint does not belong to the configuration it is loaded against."""


class NumericalError(RuntimeError):
    """Non-finite values in a network output or a training loss."""

    def __init__(
        self,
        message: str,
        episode: Optional[int] = None,
        slot: Optional[int] = None,
        layer: Optional[str] = None,
    ):
        self.episode = episode
        self.slot = slot
        self.layer = layer
        context = [
            f"{key}={value}"
            for key, value in (("episode", episode), ("slot", slot), ("layer", layer))
            if value is not None
        ]
        if context:
            message = f"{message} ({', '.join(context)})"
        super().__init__(message)

    def with_context(self, episode: int, slot: int) -> "NumericalError":
        """Return a copy of this error annotated with the training position."""
        base = str(self).split(" (")[0]
        return NumericalError(base, episode=episode, slot=slot, layer=self.layer)
