"""Scripted participants and the stimuli they race on."""

from fairsim.participants.models import (
    Decision,
    Dispatch,
    Opportunity,
    Participant,
    Stimulus,
    StimulusKind,
    StrategyError,
    StrategyKind,
)
from fairsim.participants.strategies import (
    Agent,
    EarlyLoginRacer,
    FastLinkSniper,
    HonestRacer,
    OptimisticMessenger,
    Replicator,
    RestingMaker,
    Truncator,
    build_agent,
    on_update,
    optimistic_dispatch,
    replicate_dispatch,
)

__all__ = [
    "Decision",
    "Dispatch",
    "Opportunity",
    "Participant",
    "Stimulus",
    "StimulusKind",
    "StrategyError",
    "StrategyKind",
    "Agent",
    "EarlyLoginRacer",
    "FastLinkSniper",
    "HonestRacer",
    "OptimisticMessenger",
    "Replicator",
    "RestingMaker",
    "Truncator",
    "build_agent",
    "on_update",
    "optimistic_dispatch",
    "replicate_dispatch",
]
