"""Records of computed values, kept apart from the run log."""

import json
import logging

RESULTS_TAG = "results"


class ResultsFilter(logging.Filter):

    def filter(self, record):
        """Returns True for a record tagged as a computed result."""
        return RESULTS_TAG in record.__dict__.get("tags", [])


class ResultsFormatter(logging.Formatter):
    """Write a record as one JSON object holding its message and `extra` fields.

    Exact values are logged as {p, q, r, d} dicts so a results log can be read
    back without parsing messages. Anything json cannot encode is written with str().
    """

    STANDARD_FIELDS = frozenset(logging.LogRecord("", 0, "", 0, "", None, None).__dict__) | {
        "message", "asctime", "tags",
    }

    def format(self, record):
        entry = {
            "created": self.formatTime(record, self.datefmt),
            "logger": record.name,
            "level": record.levelname,
            "msg": record.getMessage(),
        }
        entry.update({k: v for k, v in record.__dict__.items() if k not in self.STANDARD_FIELDS})
        return json.dumps(entry, default=str)
