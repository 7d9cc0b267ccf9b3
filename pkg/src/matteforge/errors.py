"""Exception hierarchy for the forge.

Every error raised by the library derives from ForgeError so callers can
catch data problems without masking programming errors.
"""


class ForgeError(Exception):
    """Base class for all forge errors."""


# --- entity catalog ---------------------------------------------------------

class DimensionMismatch(ForgeError):
    """Color raster and alpha raster disagree in height or width."""


class EmptyEntity(ForgeError):
    """Alpha matte contains no foreground (no pixel above threshold)."""


class UnknownCategory(ForgeError):
    """Category name not present in the loaded category tables."""


# --- composition ------------------------------------------------------------

class PlacementInfeasible(ForgeError):
    """Layout constraints could not be satisfied within the retry budget."""


class SizeMismatch(ForgeError):
    """Raster dimensions incompatible with the requested operation."""


class IndexOutOfRange(ForgeError):
    """Placement index outside the layout."""


# --- expressions / grammar --------------------------------------------------

class NoTrueRelation(ForgeError):
    """No relation fact holds for the requested entity in the layout."""


class UngroundableExpression(ForgeError):
    """Could not produce an expression that grounds uniquely to its target."""


class UnparsableExpression(ForgeError):
    """Text contains out-of-vocabulary tokens or matches no template."""


class AmbiguousParse(ForgeError):
    """Multiple templates match the text with different logic forms."""


# --- dataset builder --------------------------------------------------------

class UnitTooSmall(ForgeError):
    """Balance unit below the minimum implied by the class counts."""


class ImbalancedPool(ForgeError):
    """Entity pool is not in the expected 5:1:1 proportion."""


class BuildError(ForgeError):
    """A composite slot failed permanently despite resampling."""


# --- metrics ----------------------------------------------------------------

class EmptyInput(ForgeError):
    """Aggregation requested over an empty record set."""


class RangeViolation(ForgeError):
    """Alpha values outside the legal [0, 1] interval."""


class ManifestMismatch(ForgeError):
    """Prediction directory contains ids unknown to the manifest."""


# --- cli --------------------------------------------------------------------

class UsageError(ForgeError):
    """Invalid command line or configuration."""
