from builtins import classmethod, frozenset, str
from typing import Dict, Any
import logging

logger = logging.getLogger(__name__)


class EventService:
    """
    Publishes bifurcation findings (folds, flips, bubbles, claim results) to the log,
    so a long scan or verification run leaves a readable trail.
    """

    @classmethod
    def publish(cls, event_type: str, data: Dict[str, Any]) -> None:
        """
        Log one finding as ``event_type key=value ...``.

        Args:
            event_type: One of the ``EventTypes`` constants
            data: Finding details; exact values are rendered with ``str``
        """
        details = " ".join(f"{key}={value}" for key, value in data.items())
        level = logging.DEBUG if event_type in EventTypes.FREQUENT else logging.INFO
        logger.log(level, f"{event_type} {details}")


class EventTypes:
    """Constants for event types emitted by the services."""
    TANGENT_FOUND = "tangent_found"
    FOLD_DETECTED = "fold_detected"
    FLIP_DETECTED = "flip_detected"
    ORBIT_MATCH_AMBIGUOUS = "orbit_match_ambiguous"
    TRANSITION_REFINED = "transition_refined"
    BUBBLE_DETECTED = "bubble_detected"
    POINT_DETECTED = "point_detected"
    CLAIM_CHECKED = "claim_checked"

    # one per refined bracket or checked claim; logged at DEBUG
    FREQUENT = frozenset({TRANSITION_REFINED, CLAIM_CHECKED})
