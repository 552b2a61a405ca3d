from enum import Enum


class AutoName(str, Enum):
    """String enum whose values are the lower-case member names, compared case-insensitively."""

    def _generate_next_value_(name, start, count, last_values):
        return name.lower()

    def __str__(self):
        return self.value

    def __eq__(self, other):
        return str(self).lower() == str(other).lower()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self.value.lower())

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if member == value:
                return member
        raise ValueError("{!r} is not a valid {}, expected one of {}".format(
            value, cls.__name__, ', '.join(m.value for m in cls)))
