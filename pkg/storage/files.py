"""Write-then-rename helper shared by every file writer"""

import errno
import logging
import os
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, Union

logger = logging.getLogger(__name__)

PARTIAL_SUFFIX = ".partial"


@contextmanager
def atomic_write(path: Union[str, Path], mode: str = "wb", **kwargs) -> Iterator[IO]:
    """
    Yield a handle on <path>.partial and move it over <path> once the block
    finishes. A failed write never leaves a final-named file; the partial is
    removed unless the disk filled up, in which case it stays for inspection.
    """
    final = Path(path)
    partial = final.with_name(final.name + PARTIAL_SUFFIX)
    final.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(partial, mode, **kwargs) as handle:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(partial, final)
    except OSError as e:
        if e.errno == errno.ENOSPC:
            logger.error(f"❌ disk full while writing {final}; partial output kept at {partial}")
        else:
            partial.unlink(missing_ok=True)
        raise
    except BaseException:
        partial.unlink(missing_ok=True)
        raise
