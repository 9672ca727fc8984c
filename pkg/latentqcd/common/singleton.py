from threading import Lock


class SingletonMeta(type):
    """
    Thread-safe singleton metaclass. The first call creates the instance, later calls return it.
    """

    _instances = {}

    _lock: Lock = Lock()

    def __call__(cls, *args, **kwargs):
        """
        Arguments passed after the first construction are ignored.
        """
        # double creation is impossible while the lock is held
        with cls._lock:
            if cls not in cls._instances:
                instance = super().__call__(*args, **kwargs)
                cls._instances[cls] = instance
        return cls._instances[cls]
