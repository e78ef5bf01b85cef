""" exception hierarchy shared by all modules """


class SweSymmetryError(Exception):
    pass


### expression kernel ###

class UnsupportedFormError(SweSymmetryError):
    def __init__(self, node, reason):
        super().__init__("unsupported expression node {}: {}".format(node, reason))
        self.node = node


class SubstitutionCycleError(SweSymmetryError):
    def __init__(self, cycle):
        super().__init__("cyclic bindings: {}".format(" -> ".join(str(s) for s in cycle)))
        self.cycle = cycle


class UnboundSymbolError(SweSymmetryError):
    def __init__(self, symbols):
        names = sorted(str(s) for s in symbols)
        super().__init__("unbound symbols: {}".format(", ".join(names)))
        self.symbols = names


class PoleError(SweSymmetryError):
    def __init__(self, expr):
        super().__init__("zero base raised to a negative power in {}".format(expr))
        self.expr = expr


### algebra ###

class ClosureError(SweSymmetryError):
    def __init__(self, left, right, detail=""):
        msg = "[{}, {}] is not in the span of the basis".format(left, right)
        super().__init__(msg + (": " + detail if detail else ""))
        self.pair = (left, right)


### reductions / numerics ###

class DerivationError(SweSymmetryError):
    pass


class AnsatzInconsistencyError(DerivationError):
    def __init__(self, name, leftover):
        super().__init__("ansatz {} leaves dependence on {}".format(
            name, ", ".join(sorted(str(s) for s in leftover))))
        self.leftover = leftover


class RangeError(SweSymmetryError):
    pass


class IntegrationError(SweSymmetryError):
    def __init__(self, message, location=None, state=None):
        super().__init__(message)
        self.location = location
        self.state = state


class FixtureError(SweSymmetryError):
    def __init__(self, path, reason="missing"):
        super().__init__("fixture {}: {}".format(path, reason))
        self.path = path
