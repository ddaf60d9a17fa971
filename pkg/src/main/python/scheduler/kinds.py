# SPDX-License-Identifier: GPL-2.0-or-later
from dataclasses import dataclass

OPTIMAL = "opt"
MYOPIC_HOLDING = "m-S"
MYOPIC_AGE = "m-T"
IDX_VALUE = "idx-v"
IDX_CHANNEL = "idx-c"
IDX_VALUE_SAVING = "idx-v-r"
IDX_CHANNEL_SAVING = "idx-c-r"
IDX_LEARNED = "idx-v-r-q"

TAGS = (OPTIMAL, IDX_VALUE, IDX_CHANNEL, IDX_VALUE_SAVING, IDX_CHANNEL_SAVING, IDX_LEARNED,
        MYOPIC_HOLDING, MYOPIC_AGE)
UCB_TAGS = (IDX_VALUE, IDX_CHANNEL, IDX_VALUE_SAVING, IDX_CHANNEL_SAVING)
OFFLINE_KINDS = (IDX_VALUE, IDX_CHANNEL, IDX_VALUE_SAVING, IDX_CHANNEL_SAVING, MYOPIC_HOLDING, MYOPIC_AGE)
ONLINE_KINDS = (IDX_VALUE_SAVING, "{}:10".format(IDX_VALUE_SAVING), "{}:-10".format(IDX_VALUE_SAVING),
                IDX_LEARNED, MYOPIC_HOLDING, MYOPIC_AGE)


@dataclass(frozen=True)
class SchedulerKind:

    tag: str
    sigma: float = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError("unknown policy {!r}, expected one of {}".format(self.tag, ", ".join(TAGS)))
        if self.sigma is not None and self.tag not in UCB_TAGS:
            raise ValueError("policy {} takes no exploration weight".format(self.tag))

    @classmethod
    def parse(cls, text):
        text = text.strip()
        tag, sep, weight = text.partition(":")
        if not sep:
            return cls(tag)
        try:
            sigma = float(weight)
        except ValueError:
            raise ValueError("bad exploration weight in {!r}".format(text))
        return cls(tag, sigma)

    def __str__(self):
        if self.sigma is None:
            return self.tag
        return "{}:{:g}".format(self.tag, self.sigma)

    @property
    def is_myopic(self):
        return self.tag in (MYOPIC_HOLDING, MYOPIC_AGE)

    @property
    def is_index(self):
        return self.tag.startswith("idx-")

    @property
    def learned(self):
        return self.tag == IDX_LEARNED

    @property
    def energy_saving(self):
        return self.tag in (IDX_VALUE_SAVING, IDX_CHANNEL_SAVING, IDX_LEARNED)

    @property
    def channel_based(self):
        return self.tag in (IDX_CHANNEL, IDX_CHANNEL_SAVING)

    @property
    def uses_ucb(self):
        return self.sigma is not None

    @property
    def offline(self):
        """ Whether the kind has a fixed induced policy under known rates """
        return self.tag == OPTIMAL or (self.tag in OFFLINE_KINDS and self.sigma is None)


def parse_kinds(text):
    kinds = [SchedulerKind.parse(part) for part in text.split(",") if part.strip()]
    if not kinds:
        raise ValueError("no policies given")
    return kinds
