"""Exception types shared across the package.

Library code raises UserInputError for domain rejections (bad sizes,
out-of-range shifts, unsupported parameter combinations) so the CLI can
map them to a usage-error exit code without pattern-matching messages.
CertificationError marks a failed verification: a bound that did not
hold, a cross-check that disagreed, a suite that found a counterexample.
"""


class UserInputError(ValueError):
    """Invalid input rejected by a precondition check."""


class CertificationError(RuntimeError):
    """A verification suite or certified bound failed to hold."""
