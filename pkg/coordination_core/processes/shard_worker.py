"""Shard worker process in separate class for Win/Linux compatibility."""
import logging
import traceback
from multiprocessing import Process, Queue
from typing import Any, Callable, List, Sequence

log = logging.getLogger(__name__)

# Below this many items per worker the work runs in the calling process.
MIN_ITEMS_PER_WORKER = 8


class ShardWorker(Process):
    """Run function(*args, shard) in a child process and report on a queue.

    :param index: position of the shard; results are put as (index, ok, payload).
    :param function: module-level callable, so it pickles on spawn platforms.
    :param args: leading positional arguments shared by all shards.
    :param shard: the work items of this worker.
    :param results: queue receiving the result or a formatted traceback.
    """

    def __init__(self, index: int, function: Callable, args: Sequence[Any], shard: List[Any], results: Queue):
        super().__init__()
        self.index = index
        self.function = function
        self.args = tuple(args)
        self.shard = shard
        self.results = results

    def run(self):
        """Process the shard."""
        try:
            self.results.put((self.index, True, self.function(*self.args, self.shard)))
        except Exception:
            self.results.put((self.index, False, traceback.format_exc()))


def split(items: Sequence[Any], count: int) -> List[List[Any]]:
    """Contiguous shards of near-equal length, in order."""
    count = max(1, min(count, len(items)))
    size, extra = divmod(len(items), count)
    shards, start = [], 0
    for index in range(count):
        stop = start + size + (1 if index < extra else 0)
        shards.append(list(items[start:stop]))
        start = stop
    return shards


def map_shards(function: Callable, args: Sequence[Any], items: Sequence[Any], workers: int) -> List[Any]:
    """function(*args, shard) over shards of items, flattened back in item order.

    function must return one result per item of its shard.
    :raises RuntimeError: a worker failed; the message carries its traceback.
    """
    items = list(items)
    workers = min(workers, len(items) // MIN_ITEMS_PER_WORKER)
    if workers <= 1:
        return list(function(*args, items))
    shards = split(items, workers)
    results = Queue()
    processes = [ShardWorker(index, function, args, shard, results) for index, shard in enumerate(shards)]
    log.debug(f"Running {function.__name__} over {len(items)} items in {len(processes)} processes.")
    for process in processes:
        process.start()
    # Drain the queue before joining; a child blocks on exit until its results are read.
    collected, failures = {}, []
    for _ in processes:
        index, ok, payload = results.get()
        if ok:
            collected[index] = payload
        else:
            failures.append((index, payload))
    for process in processes:
        process.join()
    if failures:
        index, trace = min(failures)
        raise RuntimeError(f"Worker for shard {index} of {function.__name__} failed:\n{trace}")
    output = []
    for index in range(len(shards)):
        output.extend(collected[index])
    return output
