//! Model file: `ADVN`, version, seed, layer count, then per layer the input and output
//! widths, activation tag, and little-endian f32 weights (row-major out×in) and biases.

use std::io::{self, Read, Write};

use super::layer::{Activation, DenseLayer};
use super::net::DenseNet;
use crate::wire;

pub const MODEL_MAGIC: &[u8; 4] = b"ADVN";
pub const MODEL_VERSION: u32 = 1;

const MAX_LAYERS: usize = 64;
const MAX_WIDTH: usize = 1 << 16;

impl DenseNet<f32> {
    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        wire::put_u32(w, MODEL_VERSION)?;
        wire::put_u64(w, self.seed())?;
        wire::put_u32(w, self.layers().len() as u32)?;
        for layer in self.layers() {
            wire::put_u32(w, layer.inputs() as u32)?;
            wire::put_u32(w, layer.outputs() as u32)?;
            wire::put_u8(w, layer.activation().tag())?;
            wire::put_f32s(w, layer.weights())?;
            wire::put_f32s(w, layer.biases())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> io::Result<Self> {
        wire::expect_magic(r, MODEL_MAGIC)?;
        let version = wire::get_u32(r)?;
        if version != MODEL_VERSION {
            return Err(wire::invalid(format!("unsupported model version {version}")));
        }
        let seed = wire::get_u64(r)?;
        let n = wire::get_u32(r)? as usize;
        if n == 0 || n > MAX_LAYERS {
            return Err(wire::invalid(format!("implausible layer count {n}")));
        }
        let mut layers = Vec::with_capacity(n);
        for _ in 0..n {
            let inputs = wire::get_u32(r)? as usize;
            let outputs = wire::get_u32(r)? as usize;
            if inputs == 0 || outputs == 0 || inputs > MAX_WIDTH || outputs > MAX_WIDTH {
                return Err(wire::invalid(format!("implausible layer shape {outputs}x{inputs}")));
            }
            let tag = wire::get_u8(r)?;
            let activation = Activation::from_tag(tag)
                .ok_or_else(|| wire::invalid(format!("unknown activation tag {tag}")))?;
            let weights = wire::get_f32s(r, inputs * outputs)?;
            let biases = wire::get_f32s(r, outputs)?;
            layers.push(DenseLayer::from_parts(inputs, outputs, weights, biases, activation));
        }
        let net = DenseNet::from_layers(layers, seed).map_err(|e| wire::invalid(e.to_string()))?;
        if !net.is_finite() {
            return Err(wire::invalid("model contains non-finite parameters"));
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let net = DenseNet::<f32>::init(
            &[7, 5, 3, 2],
            &[Activation::Sigmoid, Activation::Relu, Activation::Softmax],
            99,
        )
        .unwrap();
        let mut buf = Vec::new();
        net.write_to(&mut buf).unwrap();
        let back = DenseNet::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, net);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn rejects_corrupt_files() {
        let net = DenseNet::<f32>::init(&[3, 2], &[Activation::Sigmoid], 1).unwrap();
        let mut buf = Vec::new();
        net.write_to(&mut buf).unwrap();

        let mut bad_tag = buf.clone();
        bad_tag[4 + 4 + 8 + 4 + 8] = 42;
        assert!(DenseNet::read_from(&mut bad_tag.as_slice()).is_err());

        let truncated = &buf[..buf.len() - 3];
        assert!(DenseNet::read_from(&mut &truncated[..]).is_err());

        let mut bad_version = buf.clone();
        bad_version[4] = 9;
        assert!(DenseNet::read_from(&mut bad_version.as_slice()).is_err());
    }
}
