"""Custom exceptions for the classical parts of Shor's algorithm.

This module defines domain-specific exceptions for the classical business area.
"""


class ClassicalException(Exception):
    """Base exception for all classical pre- and post-processing errors.

    This base class allows catching all classical exceptions with a single except block.
    """

    pass


class InvalidModulusError(ClassicalException):
    """Raised when the number to factor is below 2.

    Attributes:
        modulus: The rejected modulus.
    """

    def __init__(self, modulus: int) -> None:
        """Initialize InvalidModulusError.

        Args:
            modulus: The rejected modulus.
        """
        self.modulus = modulus
        super().__init__(f"Modulus must be at least 2, got {modulus}")


class NotCoprimeError(ClassicalException):
    """Raised when a base shares a factor with N or lies outside 1 < C < N.

    Attributes:
        modulus: The number to factor.
        co_prime: The rejected base.
    """

    def __init__(self, modulus: int, co_prime: int) -> None:
        """Initialize NotCoprimeError.

        Args:
            modulus: The number to factor.
            co_prime: The rejected base.
        """
        self.modulus = modulus
        self.co_prime = co_prime
        super().__init__(f"{co_prime} is not a valid co-prime base for {modulus}")


class NonCompiledInstanceError(ClassicalException):
    """Raised when an operation needs one of the compiled N=15 instances.

    Attributes:
        modulus: The requested modulus.
        co_prime: The requested base.
    """

    def __init__(self, modulus: int, co_prime: int) -> None:
        """Initialize NonCompiledInstanceError.

        Args:
            modulus: The requested modulus.
            co_prime: The requested base.
        """
        self.modulus = modulus
        self.co_prime = co_prime
        super().__init__(f"No compiled network for N={modulus}, C={co_prime}; use C=11 or C=2 with N=15")
