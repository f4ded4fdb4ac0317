"""Reference draws for RngStream, computed from the stream formula in rng.hpp."""

M = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STREAM_SALT = 0xD1B54A32D192ED03
HI_SALT = 0x8CB92BA72F3D8DD7


def mix(x):
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M
    return x ^ (x >> 31)


def draws(seed, stream_id, n):
    lo = mix(seed ^ mix((stream_id + STREAM_SALT) & M))
    hi = mix(lo ^ HI_SALT)
    return [mix(mix((lo + i * GOLDEN) & M) ^ hi) for i in range(n)]


if __name__ == "__main__":
    for seed, sid in [(0, 0), (42, 7), (0xFFFFFFFFFFFFFFFF, 123456789)]:
        print("{%d, %d, {" % (seed, sid))
        vals = draws(seed, sid, 16)
        for i in range(0, 16, 4):
            print("  " + ", ".join("0x%016XULL" % v for v in vals[i:i + 4]) + ",")
        print("}},")
