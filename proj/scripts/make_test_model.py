#!/usr/bin/env python3
"""Generate the tiny frozen TensorFlow detector fixtures under tests/fixtures/model.

Emits a full graph (image -> detection_out) plus pre-split prefix/head graph
pairs for each supported split index. The head graphs start from a feature
placeholder, so running one executes no prefix layers by construction.

The network is a toy SSD-alike: conv stack, global pooling, a dense layer,
and an affine that shapes 14 sigmoid outputs into two detection rows of
[batch, class, score, left, top, right, bottom] with boxes guaranteed inside
the unit square (left in (.05,.45), right in (.55,.95), same for top/bottom).

Kept to ops the OpenCV TensorFlow importer handles without surprises:
Conv2D/BiasAdd/Relu/Mean/Reshape/MatMul/Sigmoid. The box affine is a MatMul
against a diagonal matrix rather than an elementwise Mul on a 4D constant,
which older importers permute or fuse.
"""

import os
import sys

import numpy as np

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")
import tensorflow as tf  # noqa: E402

tf1 = tf.compat.v1

IN_H, IN_W = 32, 48
OUT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures", "model")

ROW = 7
ROWS = 2
SCALE = np.tile(np.array([0.0, 0.0, 1.0, 0.4, 0.4, 0.4, 0.4], np.float32), ROWS)
OFFSET = np.tile(np.array([0.0, 1.0, 0.0, 0.05, 0.05, 0.55, 0.55], np.float32), ROWS)


def make_weights(seed=7):
    r = np.random.RandomState(seed)

    def w(shape, scale):
        return (r.randn(*shape) * scale).astype(np.float32)

    return {
        "w1": w([3, 3, 3, 4], 0.30), "b1": w([4], 0.10),
        "w2": w([3, 3, 4, 8], 0.25), "b2": w([8], 0.10),
        "w3": w([3, 3, 8, 8], 0.25), "b3": w([8], 0.10),
        "wd": w([8, ROW * ROWS], 0.60), "bd": w([ROW * ROWS], 0.20),
    }


def conv(x, kernel, bias, name):
    y = tf.nn.conv2d(x, tf.constant(kernel), strides=[1, 2, 2, 1], padding="SAME")
    y = tf.nn.bias_add(y, tf.constant(bias))
    return tf.nn.relu(y, name=name)


def build_prefix(x, wts, upto):
    y = x
    if upto >= 1:
        y = conv(y, wts["w1"], wts["b1"], "block1")
    if upto >= 2:
        y = conv(y, wts["w2"], wts["b2"], "feat")
    return y


def build_head(feat, wts):
    y = conv(feat, wts["w3"], wts["b3"], "block3")
    y = tf.reduce_mean(y, axis=[1, 2], keepdims=True, name="pool")
    y = tf.reshape(y, [1, 8], name="flat")
    y = tf.matmul(y, tf.constant(wts["wd"]))
    y = tf.nn.bias_add(y, tf.constant(wts["bd"]), name="gemm")
    y = tf.sigmoid(y, name="sig")
    y = tf.matmul(y, tf.constant(np.diag(SCALE)))
    y = tf.nn.bias_add(y, tf.constant(OFFSET), name="affine")
    return tf.reshape(y, [1, 1, ROWS, ROW], name="detection_out")


def head_from(wts, upto):
    # Remaining layers when the split sits after `upto` prefix convs.
    def apply(feat):
        y = feat
        if upto < 2:
            y = conv(y, wts["w2"], wts["b2"], "feat")
        return build_head(y, wts)

    return apply


def save_graph(build, out_path):
    g = tf.Graph()
    with g.as_default():
        build()
    gd = g.as_graph_def()
    with open(out_path, "wb") as f:
        f.write(gd.SerializeToString())
    print("wrote", out_path, f"({len(gd.node)} nodes)")


def feat_shape(upto):
    h, w = IN_H, IN_W
    c = 3
    for i, cc in enumerate([4, 8], start=1):
        if i > upto:
            break
        h, w, c = (h + 1) // 2, (w + 1) // 2, cc
    return h, w, c


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    wts = make_weights()

    save_graph(
        lambda: build_head(build_prefix(tf1.placeholder(tf.float32, [1, IN_H, IN_W, 3], name="image"), wts, 2), wts),
        os.path.join(OUT_DIR, "full.pb"))

    for m in (1, 2):
        fh, fw, fc = feat_shape(m)
        save_graph(
            lambda m=m: build_prefix(tf1.placeholder(tf.float32, [1, IN_H, IN_W, 3], name="image"), wts, m),
            os.path.join(OUT_DIR, f"m{m}_prefix.pb"))
        save_graph(
            lambda m=m, fh=fh, fw=fw, fc=fc: head_from(wts, m)(
                tf1.placeholder(tf.float32, [1, fh, fw, fc], name="feat_in")),
            os.path.join(OUT_DIR, f"m{m}_head.pb"))

    return 0


if __name__ == "__main__":
    sys.exit(main())
