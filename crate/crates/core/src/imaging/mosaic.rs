use super::frame::Frame;
use crate::error::{Error, Result};

/// Average-pools `block x block` tiles and upsamples by nearest neighbour.
///
/// Tiles are anchored at the origin; partial tiles on the right and bottom
/// edges use the mean of the pixels they cover. Means round half up.
pub fn mosaic(frame: &Frame, block: usize) -> Result<Frame> {
    if block == 0 {
        return Err(Error::InvalidArgument("mosaic block must be >= 1".into()));
    }
    if block == 1 {
        return Ok(frame.clone());
    }
    let (h, w, c) = (frame.height(), frame.width(), frame.channels());
    let mut out = frame.clone();
    let mut sums = vec![0u64; c];
    for ty in (0..h).step_by(block) {
        let y1 = (ty + block).min(h);
        for tx in (0..w).step_by(block) {
            let x1 = (tx + block).min(w);
            let count = ((y1 - ty) * (x1 - tx)) as u64;
            sums.iter_mut().for_each(|s| *s = 0);
            for y in ty..y1 {
                for x in tx..x1 {
                    for (ch, s) in sums.iter_mut().enumerate() {
                        *s += frame.get(y, x, ch) as u64;
                    }
                }
            }
            for (ch, &s) in sums.iter().enumerate() {
                let mean = ((2 * s + count) / (2 * count)) as u8;
                for y in ty..y1 {
                    for x in tx..x1 {
                        out.set(y, x, ch, mean);
                    }
                }
            }
        }
    }
    Ok(out)
}
