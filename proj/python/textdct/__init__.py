"""DCT mask codec, kernel labels, segmented NMS and losses for text detection.

Arrays that already have the expected dtype and C layout are read in place;
other numeric inputs are converted with one copy. Masks are uint8 or bool,
score/vector planes float32, coordinates any float or integer type.
"""

from ._textdct import (
    CodecError,
    DataError,
    GeometryError,
    __version__,
    binarize,
    decode,
    dice_loss,
    encode,
    encode_polygon,
    generate_labels,
    giou_loss,
    k_nms,
    mask_vector_loss,
    nms,
    postprocess,
    reconstruction_iou,
    s_nms,
    smooth_l1,
    smooth_l1_grad,
    total_loss,
)

__all__ = [
    "CodecError",
    "DataError",
    "GeometryError",
    "__version__",
    "binarize",
    "decode",
    "dice_loss",
    "encode",
    "encode_polygon",
    "generate_labels",
    "giou_loss",
    "k_nms",
    "mask_vector_loss",
    "nms",
    "postprocess",
    "reconstruction_iou",
    "s_nms",
    "smooth_l1",
    "smooth_l1_grad",
    "total_loss",
]
