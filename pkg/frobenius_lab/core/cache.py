import collections
import threading

from frobenius_lab.core.log_manager import get_logger

logger = get_logger("frobenius_lab.cache")


class LRUCache:
    """A thread-safe Least Recently Used (LRU) cache for constructed structures.

    Hom-lattices, tensor lattices and quantales are immutable once built, so a
    cached value can be handed to any caller in the same process.

    Attributes:
        capacity (int): Maximum number of items the cache can hold.
        cache (OrderedDict): Stores the cache items.
        lock (threading.Lock): Ensures thread safety.
    """
    def __init__(self, capacity: int, name: str = "cache"):
        """Initializes the LRUCache.

        Args:
            capacity (int): The maximum number of items the cache can hold. Must be non-negative.
            name (str): Label used in debug logging.

        Raises:
            ValueError: If capacity is negative.
        """
        if capacity < 0:
            raise ValueError("Capacity must be non-negative")
        self.capacity = capacity
        self.name = name
        self.cache = collections.OrderedDict()
        self.lock = threading.Lock()

    def get(self, key):
        """Retrieves an item from the cache and marks it as recently used.

        Args:
            key: The key to retrieve from the cache.

        Returns:
            The value associated with the key, or None if not found.
        """
        with self.lock:
            if key not in self.cache:
                return None
            self.cache.move_to_end(key)
            return self.cache[key]

    def put(self, key, value):
        """Adds an item to the cache, evicting the oldest if capacity is reached.

        Args:
            key: The key to add or update in the cache.
            value: The value to associate with the key.
        """
        with self.lock:
            self.cache[key] = value
            self.cache.move_to_end(key)
            if len(self.cache) > self.capacity:
                self.cache.popitem(last=False)

    def get_or_compute(self, key, factory):
        """Returns the cached value for ``key``, building it with ``factory`` on a miss.

        The factory runs outside the lock; two threads missing on the same key
        may both build the value, and the last one stored wins.

        Args:
            key: Hashable cache key.
            factory (Callable[[], Any]): Builds the value.

        Returns:
            The cached or freshly built value.
        """
        value = self.get(key)
        if value is not None:
            logger.debug(f"{self.name} HIT: {key[0] if isinstance(key, tuple) else key}")
            return value
        value = factory()
        self.put(key, value)
        return value

    def __contains__(self, key):
        with self.lock:
            return key in self.cache

    def __len__(self):
        with self.lock:
            return len(self.cache)

    def clear(self):
        """Clears all items from the cache."""
        with self.lock:
            self.cache.clear()

    def resize(self, capacity):
        """Changes the capacity, evicting the oldest items if needed."""
        if capacity < 0:
            raise ValueError("Capacity must be non-negative")
        with self.lock:
            self.capacity = capacity
            while len(self.cache) > self.capacity:
                self.cache.popitem(last=False)


# Process-wide cache for hom-lattices, tensor lattices and quantales.
structure_cache = LRUCache(capacity=64, name="structures")
