"""Store-and-forward switch delay model."""

import math
from dataclasses import dataclass

from fairsim.infra.errors import InvalidMessageError
from fairsim.kernel.time import SimTime


def switch_forward(message_bytes: int, truncated: bool, link_rate: float) -> SimTime:
    """Delay a store-and-forward switch adds before forwarding a message.

    The whole unit is buffered before it is checked and forwarded, so the delay
    is ``ceil(size / rate)``. A truncated message is simply smaller; the flag is
    carried for the gateway validator and does not change the arithmetic.

    The delay is non-decreasing in size. It is strictly increasing only for
    ``link_rate <= 1``; above that, sizes that round up to the same nanosecond
    (3 and 4 bytes at rate 2) are forwarded equally fast.

    Args:
        message_bytes: Size of the buffered unit
        truncated: Whether fields were cut from the message
        link_rate: Bytes per nanosecond

    Returns:
        Processing delay in nanoseconds

    Raises:
        InvalidMessageError: If the size or rate is not positive
    """
    if message_bytes <= 0:
        raise InvalidMessageError(f"Switch input must be > 0 bytes, got {message_bytes}")
    if link_rate <= 0:
        raise InvalidMessageError(f"Link rate must be > 0, got {link_rate}")
    return math.ceil(message_bytes / link_rate)


@dataclass(frozen=True)
class StoreAndForwardSwitch:
    """A switch stage in front of a gateway."""
    link_rate: float = 1.0

    def forward(self, message_bytes: int, truncated: bool = False) -> SimTime:
        return switch_forward(message_bytes, truncated, self.link_rate)
