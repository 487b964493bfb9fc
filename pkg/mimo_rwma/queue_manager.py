"""仿真帧任务队列管理。"""

from __future__ import annotations

import asyncio
from typing import Awaitable, Callable, List, Optional

FrameJob = int
FrameHandler = Callable[[FrameJob], Awaitable[None]]
ErrorHandler = Callable[[Exception, FrameJob], Awaitable[None]]


class FrameQueue:
    """由多个协程 worker 并发处理帧任务，任务之间互不共享状态。"""

    def __init__(
        self,
        handler: FrameHandler,
        *,
        workers: int = 1,
        error_handler: Optional[ErrorHandler] = None,
    ) -> None:
        if workers < 1:
            raise ValueError("并行度必须大于0")
        self.queue: asyncio.Queue[Optional[FrameJob]] = asyncio.Queue()
        self.handler = handler
        self.error_handler = error_handler
        self.workers = workers
        self._tasks: List[asyncio.Task[None]] = []
        self._running = False

    async def start(self) -> None:
        if self._tasks and not all(task.done() for task in self._tasks):
            return
        self._running = True
        self._tasks = [
            asyncio.create_task(self._worker(), name=f"mimo-frame-worker-{index}")
            for index in range(self.workers)
        ]

    async def stop(self) -> None:
        if not self._tasks:
            return
        self._running = False
        for _ in self._tasks:
            await self.queue.put(None)
        await asyncio.gather(*self._tasks)
        self._tasks = []

    async def enqueue(self, job: FrameJob) -> None:
        await self.queue.put(job)

    async def join(self) -> None:
        await self.queue.join()

    async def _worker(self) -> None:
        while self._running:
            job = await self.queue.get()
            if job is None:
                self.queue.task_done()
                break
            try:
                await self.handler(job)
            except Exception as exc:  # noqa: BLE001
                if self.error_handler:
                    await self.error_handler(exc, job)
            finally:
                self.queue.task_done()
