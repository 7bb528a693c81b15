/// Packed 8-bit RGB image, row-major, origin at the top-left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

pub type Rgb = [u8; 3];

impl RgbImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let n = width as usize * height as usize;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            data.extend_from_slice(&color);
        }
        Self { width, height, data }
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    pub fn put(&mut self, x: u32, y: u32, c: Rgb) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&c);
    }

    /// `round(dst·(1−α) + src·α)` per channel.
    pub fn blend(&mut self, x: u32, y: u32, src: Rgb, alpha: f64) {
        if alpha >= 1.0 {
            self.put(x, y, src);
            return;
        }
        let dst = self.get(x, y);
        let mix = |d: u8, s: u8| (d as f64 * (1.0 - alpha) + s as f64 * alpha + 0.5).floor().clamp(0.0, 255.0) as u8;
        self.put(x, y, [mix(dst[0], src[0]), mix(dst[1], src[1]), mix(dst[2], src[2])]);
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn count_non_background(&self) -> usize {
        self.pixels().filter(|p| *p != [0, 0, 0]).count()
    }
}
