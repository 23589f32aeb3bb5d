import logging
import os
import sys
import time
from collections import deque

import sentry_sdk

logger = logging.getLogger("quiver")

RECENT_EVENTS = deque(maxlen=300)


def init_sentry():
    dsn = os.environ.get("SENTRY_DSN")
    if not dsn:
        return  # optional; stay silent when not configured

    sentry_sdk.init(
        dsn=dsn,
        traces_sample_rate=0.1,
        send_default_pii=False,
        environment=os.environ.get("ENV", "production"),
    )


def configure_logging(level: str = "WARNING"):
    # stderr only: stdout carries the byte-stable command output
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(levelname)s | %(name)s | %(message)s",
        stream=sys.stderr,
        force=True,
    )


def track(event, **data):
    entry = {
        "event": event,
        "data": data,
        "ts": time.time(),
    }
    logger.info(f"{event} | {data}")
    RECENT_EVENTS.appendleft(entry)


def report_exception(exc: BaseException):
    # no-op when init_sentry() did not configure a client
    sentry_sdk.capture_exception(exc)
