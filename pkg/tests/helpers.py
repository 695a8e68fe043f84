from gsemkit.core import Signature

BIN = ("0", "1")


def binary_signature(*names, allowed="all"):
    return Signature.build(endo={n: BIN for n in names}, allowed=allowed)
