"""Exception hierarchy shared by all pushbroom modules."""


class PushbroomError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(PushbroomError, ValueError):
    """An image, mask, or record violates a structural precondition."""


class InvalidParameterError(PushbroomError, ValueError):
    """A configuration or operation parameter is out of its legal range."""


class AnnotationParseError(PushbroomError, ValueError):
    """An annotation document is malformed; message carries the location."""


class LabelMappingError(PushbroomError, ValueError):
    """An annotation label string has no entry in the class palette."""


class ManifestError(PushbroomError, ValueError):
    """A dataset manifest is missing, malformed, or internally inconsistent."""
