from __future__ import annotations

from typing import TYPE_CHECKING

from ..common import Transferable
from .notifications import WatcherNotification

if TYPE_CHECKING:
    from .pool import WatcherPool

Handlers = dict[type[WatcherNotification], callable]


class Watcher(Transferable, is_base_type=True):
    """Watchers observe the experiments and act on their results, e.g. by logging or saving reports.

    They never interfere with the computations that send the notifications.
    """

    def __init__(
        self,
        notification_of_interest: Handlers | None = None,
        fallback_handler: callable | None = None,
    ) -> None:
        """Initialize the watcher

        Args:
            notification_of_interest (dict[type[WatcherNotification], callable]): The notifications of interest
            fallback_handler (callable): Handler for all other notifications
        """
        self.notification_of_interest = notification_of_interest or {}
        self.fallback_handler = fallback_handler
        self.pool: WatcherPool | None = None

    def set_pool(self, pool: WatcherPool) -> Watcher:
        self.pool = pool
        return self

    def listen(
        self, notification: WatcherNotification, origin: Watcher | None = None
    ) -> None:
        """Dispatches the notification to the handlers of all matching notification types.

        Args:
            notification (WatcherNotification): The notification
            origin (Watcher): The origin of the notification
        """
        handled = False
        for notification_type, handler in self.notification_of_interest.items():
            if isinstance(notification, notification_type):
                handler(notification, origin)
                handled = True
        if not handled and self.fallback_handler is not None:
            self.fallback_handler(notification, origin)
