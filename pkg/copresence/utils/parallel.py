from typing import Any, Callable, Iterable, List

from copresence.logger import init_logger

logger = init_logger(__name__)


class ParallelRunner:
    """Order-preserving map, serial for one worker and on ray otherwise."""

    def __init__(self, num_workers: int = 1) -> None:
        assert num_workers >= 1
        self._num_workers = num_workers

    @property
    def num_workers(self) -> int:
        return self._num_workers

    def map(self, func: Callable[[Any], Any], collection: Iterable[Any]) -> List[Any]:
        items = list(collection)
        if self._num_workers == 1 or len(items) <= 1:
            return [func(item) for item in items]

        import ray

        ray.init(
            num_cpus=self._num_workers,
            ignore_reinit_error=True,
            include_dashboard=False,
            log_to_driver=False,
        )
        logger.info(f"Dispatching {len(items)} tasks to {self._num_workers} ray workers")

        remote_func = ray.remote(func)
        # ray.get keeps the submission order, so the merge is deterministic
        promises = [remote_func.remote(item) for item in items]
        return ray.get(promises)
