"""Exceptions raised by uhr_wavelets."""


class BaseException(Exception):
    """The base class for all exceptions raised by uhr_wavelets."""


class ConfigurationException(BaseException):
    """
    Raised when there's an invalid configuration setting

    Args:
        message (str): A detailed description of the configuration problem
                       which is presented to the user.
    """

    def __init__(self, message):
        super(ConfigurationException, self).__init__(message)
        self.message = message

    def __str__(self):
        return "Configuration error: " + self.message


class DataError(BaseException):
    """
    Base class for errors caused by the data being processed rather than by
    the way the library is used. The command line interface exits with status
    2 when one of these is raised.
    """


class DimensionError(DataError):
    """
    Raised when a plane extent does not satisfy a divisibility or minimum size
    requirement.

    Args:
        axis (str): The offending axis, "height" or "width".
        size (int): The extent that was provided.
        divisor (int): The value the extent must be divisible by, or None if
            the problem is not divisibility.
        reason (str): A description used instead of the generated one.
    """

    def __init__(self, axis, size, divisor=None, reason=None):
        super(DimensionError, self).__init__(axis, size, divisor, reason)
        self.axis = axis
        self.size = size
        self.divisor = divisor
        self.reason = reason

    def __str__(self):
        if self.reason:
            return "{} {}: {}".format(self.axis, self.size, self.reason)
        return "{} {} is not divisible by {}".format(self.axis, self.size, self.divisor)

    def __repr__(self):
        return "DimensionError(axis={}, size={}, divisor={}, reason={})".format(
            self.axis, self.size, self.divisor, self.reason
        )


class ShapeError(DataError):
    """Raised when arrays, subbands or patches that must agree in shape do not."""


class DecodeError(DataError):
    """
    Raised when an image file cannot be decoded.

    Args:
        path (str): The path of the file that failed to decode.
        reason (str): What the decoder complained about.
    """

    def __init__(self, path, reason=None):
        super(DecodeError, self).__init__(path, reason)
        self.path = path
        self.reason = reason

    def __str__(self):
        return "Unable to decode {}: {}".format(self.path, self.reason)


class UnsupportedDepthError(DecodeError):
    """Raised for PNG files that are not 8 bits per sample."""

    def __str__(self):
        return "Unsupported sample depth in {}: {}".format(self.path, self.reason)


class FormatError(DataError):
    """Raised when a raw tensor file is malformed or a tensor cannot be written."""


class LabelError(DataError):
    """
    Raised when a label map holds a category id outside the declared range, or
    when an operation needs valid (non-ignore) pixels and there are none.
    """


class ManifestError(DataError):
    """Raised when a JSON manifest or report fails validation with its schema."""


class ModelError(BaseException):
    """
    Raised when the toy network is used incorrectly, for example calling
    backward without the cache from a training-mode forward pass.
    """
