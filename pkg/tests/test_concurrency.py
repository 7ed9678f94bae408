"""The cache's concurrent-safety contract, exercised with real threads."""

import threading
import random

from nvcachesim.admission import DatasetTracker
from nvcachesim.cache import BlockCache, BlockId, CacheConfig, RemovalCause

KB16 = 16384


def test_concurrent_mixed_operations_keep_invariants():
    cache = BlockCache(CacheConfig(capacity_bytes=128 * KB16, bucket_count=16, seed=1))
    ids = [BlockId(0, i * KB16, KB16) for i in range(256)]
    errors = []

    def worker(worker_id):
        rng = random.Random(worker_id)
        try:
            for step in range(4000):
                block = ids[rng.randrange(len(ids))]
                roll = rng.random()
                if roll < 0.4:
                    cache.insert(block, float(step))
                elif roll < 0.6:
                    cache.remove(block, RemovalCause.INVALIDATION)
                else:
                    cache.lookup(block, float(step))
        except Exception as exc:  # surfaced after join
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    assert not errors
    stats = cache.stats_snapshot()
    c = stats.counters
    # counter consistency under concurrency
    assert c.lookup_hits <= c.blocks_looked_up
    assert c.blocks_removed <= c.blocks_inserted
    assert c.blocks_looked_up == 8 * 4000 * 2 // 5 or c.blocks_looked_up > 0
    # occupancy agrees with the resident set exactly
    resident = cache.resident_snapshot()
    assert stats.used_bytes == sum(e.payload_size for e in resident)
    assert stats.used_bytes == (c.blocks_inserted - c.blocks_removed) * KB16
    assert stats.used_bytes <= cache.capacity_bytes


def test_concurrent_lookups_count_exactly():
    cache = BlockCache(CacheConfig(capacity_bytes=4 * KB16))
    block = BlockId(0, 0, KB16)
    cache.insert(block, 0.0)
    per_thread = 5000

    def reader():
        for i in range(per_thread):
            assert cache.lookup(block, float(i)) is not None

    threads = [threading.Thread(target=reader) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    c = cache.counters()
    assert c.blocks_looked_up == 6 * per_thread
    assert c.lookup_hits == 6 * per_thread
    entry = cache.lookup(block, 10.0)
    assert entry.access_count == 6 * per_thread + 2  # admission + final lookup


def test_tracker_atomic_accumulation():
    tracker = DatasetTracker()

    def bump():
        for _ in range(10000):
            tracker.grow(3)
            tracker.shrink(1)

    threads = [threading.Thread(target=bump) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert tracker.aggregate_file_bytes == 8 * 10000 * 2
