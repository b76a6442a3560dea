"""Retry policy helpers for flaky network calls."""

import random
import time

BASE_DELAY = 0.1
MAX_DELAY = 5.0
MAX_ATTEMPTS = 5
JITTER = 0.1


class GiveUp(Exception):
    pass


def _sleep(seconds):
    time.sleep(seconds)


def _jitter(delay):
    return delay * (1 + random.uniform(-JITTER, JITTER))


def backoff_delay(attempt):
    delay = BASE_DELAY * (2 ** attempt)
    return min(delay, MAX_DELAY)


def with_retries(call, attempts=MAX_ATTEMPTS):
    last = None
    for attempt in range(attempts):
        try:
            return call()
        except OSError as exc:
            last = exc
            _sleep(_jitter(backoff_delay(attempt)))
    raise GiveUp(str(last))
