"""
Exception hierarchy for the stego-hawk toolkit.

Every family carries the exit code the command-line front end reports for it,
so the CLI maps failures to stable exit statuses without a lookup table.
"""


class StegoHawkError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1


# Invalid arguments (exit 2)

class InvalidParameter(StegoHawkError, ValueError):
    """A parameter is outside the range its owning module accepts"""
    exit_code = 2


class DimensionMismatch(InvalidParameter):
    """Two images that must be compared have different sizes"""


class ImageTooSmall(InvalidParameter):
    """Image is smaller than the SSIM window"""


class InvalidBounds(InvalidParameter):
    """Search bounds are inconsistent (lower > upper, shape mismatch, non-finite)"""


# Capacity (exit 3)

class CapacityError(StegoHawkError):
    """The payload cannot be placed in the available slots"""
    exit_code = 3


class CapacityExceeded(CapacityError):
    """Payload needs more bits than the slots can carry"""

    def __init__(self, required_bits: int, available_bits: int, detail: str = ""):
        self.required_bits = int(required_bits)
        self.available_bits = int(available_bits)
        message = f"capacity exceeded: payload needs {self.required_bits} bits, only {self.available_bits} available"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class PlanInfeasible(CapacityError):
    """More plan coordinates than candidate slots"""


class EmptyCandidateSet(CapacityError):
    """Candidate selection produced no slots"""


class PayloadTooLarge(CapacityError):
    """Audio data does not fit the 32-bit length field of the frame"""


# Malformed or unsupported input (exit 4)

class InputError(StegoHawkError):
    """An input file cannot be decoded"""
    exit_code = 4


class MalformedContainer(InputError):
    """WAV bytes are not a well-formed RIFF/WAVE container"""


class UnsupportedFormat(InputError):
    """WAV is well formed but not 8/16-bit PCM mono/stereo"""


class MalformedImage(InputError):
    """Image bytes are truncated or corrupt"""


class UnsupportedImage(InputError):
    """Image container or pixel format is not lossless 8-bit color"""


class MalformedKey(InputError):
    """Key file bytes do not follow the key layout"""


# Integrity failures at extraction time (exit 5)

class IntegrityError(StegoHawkError):
    """Recovered data or key does not verify"""
    exit_code = 5


class BadMagic(IntegrityError):
    """Bitstream does not start with the frame magic"""


class VersionMismatch(IntegrityError):
    """Frame or key was written by an unknown format version"""


class LengthMismatch(IntegrityError):
    """Bitstream is shorter than its header declares"""


class ChecksumMismatch(IntegrityError):
    """CRC-32 check failed: wrong key, wrong image or corruption"""


class KeyMismatch(IntegrityError):
    """Key does not belong to the given stego image"""


class SlotOutOfBounds(IntegrityError):
    """A plan slot points outside the image"""
