"""Wire-level envelope around order messages."""

from dataclasses import dataclass
from typing import Optional

from fairsim.book.models import Message


DEFAULT_MESSAGE_BYTES = 200


@dataclass(frozen=True)
class WireMessage:
    """An order message as it travels from a participant to an engine.

    ``truncated`` marks a message whose fields were cut to shrink it;
    ``critical_intact`` is False when the cut reached fields the gateway
    validator needs.
    """
    message: Message
    size_bytes: int = DEFAULT_MESSAGE_BYTES
    truncated: bool = False
    critical_intact: bool = True
    copy_index: int = 0

    @property
    def participant(self) -> str:
        return self.message.participant

    @property
    def message_id(self) -> int:
        return self.message.order_id

    @property
    def stimulus_id(self) -> Optional[int]:
        return self.message.stimulus_id

    @property
    def is_valid(self) -> bool:
        return not self.truncated or self.critical_intact

    def key(self) -> tuple:
        """Identity of this copy on the wire."""
        return (self.participant, self.message_id, self.copy_index)

    def dedup_key(self) -> tuple:
        """Identity shared by every replicated copy."""
        return (self.participant, self.message_id)
