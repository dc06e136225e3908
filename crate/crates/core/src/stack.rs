use num_traits::Float;

use crate::error::{Error, Result};

/// The four per-pixel grasp channels, in on-disk order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Quality,
    Cos,
    Sin,
    Width,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::Quality, Channel::Cos, Channel::Sin, Channel::Width];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Quality => "q",
            Channel::Cos => "cos",
            Channel::Sin => "sin",
            Channel::Width => "width",
        }
    }

    /// Nominal value range of the channel, used for visualisation.
    pub fn range(self) -> (f64, f64) {
        match self {
            Channel::Quality | Channel::Width => (0.0, 1.0),
            Channel::Cos | Channel::Sin => (-1.0, 1.0),
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "quality" => Ok(Channel::Quality),
            "cos" => Ok(Channel::Cos),
            "sin" => Ok(Channel::Sin),
            "width" | "w" => Ok(Channel::Width),
            other => Err(Error::InvalidConfig(format!("unknown channel `{other}`"))),
        }
    }
}

/// `bins x rows x cols` rasters for quality, angle components and normalised
/// width. Each channel is stored bin-major, then row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspMapStack<T = f32> {
    pub bins: usize,
    pub rows: usize,
    pub cols: usize,
    pub q: Vec<T>,
    pub cos: Vec<T>,
    pub sin: Vec<T>,
    pub width: Vec<T>,
}

impl<T: Float> GraspMapStack<T> {
    pub fn zeros(bins: usize, rows: usize, cols: usize) -> Self {
        let n = bins * rows * cols;
        Self {
            bins,
            rows,
            cols,
            q: vec![T::zero(); n],
            cos: vec![T::zero(); n],
            sin: vec![T::zero(); n],
            width: vec![T::zero(); n],
        }
    }

    /// Builds a stack from four channel buffers, checking their lengths.
    pub fn from_channels(
        bins: usize,
        rows: usize,
        cols: usize,
        q: Vec<T>,
        cos: Vec<T>,
        sin: Vec<T>,
        width: Vec<T>,
    ) -> Result<Self> {
        let n = bins * rows * cols;
        for (name, len) in [
            ("q", q.len()),
            ("cos", cos.len()),
            ("sin", sin.len()),
            ("width", width.len()),
        ] {
            if len != n {
                return Err(Error::ShapeMismatch(format!(
                    "channel {name} has {len} values, expected {bins}x{rows}x{cols}"
                )));
            }
        }
        Ok(Self {
            bins,
            rows,
            cols,
            q,
            cos,
            sin,
            width,
        })
    }

    /// Number of elements in one channel (`bins * rows * cols`).
    pub fn channel_len(&self) -> usize {
        self.bins * self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.channel_len() == 0
    }

    #[inline]
    pub fn index(&self, bin: usize, row: usize, col: usize) -> usize {
        (bin * self.rows + row) * self.cols + col
    }

    pub fn channel(&self, c: Channel) -> &[T] {
        match c {
            Channel::Quality => &self.q,
            Channel::Cos => &self.cos,
            Channel::Sin => &self.sin,
            Channel::Width => &self.width,
        }
    }

    pub fn channel_mut(&mut self, c: Channel) -> &mut [T] {
        match c {
            Channel::Quality => &mut self.q,
            Channel::Cos => &mut self.cos,
            Channel::Sin => &mut self.sin,
            Channel::Width => &mut self.width,
        }
    }

    /// One `rows x cols` plane of a channel.
    pub fn plane(&self, c: Channel, bin: usize) -> &[T] {
        let n = self.rows * self.cols;
        &self.channel(c)[bin * n..(bin + 1) * n]
    }

    pub fn same_shape<U>(&self, other: &GraspMapStack<U>) -> bool {
        self.bins == other.bins && self.rows == other.rows && self.cols == other.cols
    }

    pub fn check_same_shape<U>(&self, other: &GraspMapStack<U>) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{}x{}x{} vs {}x{}x{}",
                self.bins, self.rows, self.cols, other.bins, other.rows, other.cols
            )))
        }
    }

    pub fn all_finite(&self) -> bool {
        Channel::ALL
            .iter()
            .all(|&c| self.channel(c).iter().all(|v| v.is_finite()))
    }

    /// Element-wise conversion to another float type.
    pub fn cast<U: Float>(&self) -> GraspMapStack<U> {
        let conv = |v: &Vec<T>| v.iter().map(|x| U::from(*x).unwrap_or_else(U::nan)).collect();
        GraspMapStack {
            bins: self.bins,
            rows: self.rows,
            cols: self.cols,
            q: conv(&self.q),
            cos: conv(&self.cos),
            sin: conv(&self.sin),
            width: conv(&self.width),
        }
    }
}
