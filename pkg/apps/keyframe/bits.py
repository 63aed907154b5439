"""MSB-first bit packing with Exp-Golomb codes."""

from apps.common.errors import CorruptPayload

# longest Exp-Golomb prefix accepted when reading
MAX_PREFIX = 32


class BitWriter:
    __slots__ = ("chunks", "width")

    def __init__(self):
        self.chunks = []
        self.width = 0

    def write(self, value, width):
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        if width:
            self.chunks.append(format(value, f"0{width}b"))
            self.width += width

    def write_ue(self, value):
        """Unsigned Exp-Golomb."""
        code = value + 1
        length = code.bit_length()
        self.write(0, length - 1)
        self.write(code, length)

    def write_se(self, value):
        """Signed Exp-Golomb: 1, -1, 2, -2, ... map to 1, 2, 3, 4, ..."""
        self.write_ue(2 * value - 1 if value > 0 else -2 * value)

    def getvalue(self):
        """Packed bytes, the last one zero-padded."""
        bits = "".join(self.chunks)
        bits += "0" * (-len(bits) % 8)
        if not bits:
            return b""
        return int(bits, 2).to_bytes(len(bits) // 8, "big")


class BitReader:
    __slots__ = ("bits", "pos")

    def __init__(self, data):
        self.bits = "".join(format(byte, "08b") for byte in data)
        self.pos = 0

    @property
    def remaining(self):
        return len(self.bits) - self.pos

    def read(self, width):
        if width > self.remaining:
            raise CorruptPayload(f"needed {width} bits, only {self.remaining} left")
        value = int(self.bits[self.pos : self.pos + width], 2) if width else 0
        self.pos += width
        return value

    def read_ue(self):
        one = self.bits.find("1", self.pos)
        if one < 0:
            raise CorruptPayload("ran out of bits inside an Exp-Golomb prefix")
        zeros = one - self.pos
        if zeros > MAX_PREFIX:
            raise CorruptPayload(f"Exp-Golomb prefix of {zeros} zeros")
        self.pos = one
        return self.read(zeros + 1) - 1

    def read_se(self):
        code = self.read_ue()
        return (code + 1) // 2 if code % 2 else -(code // 2)
