//! Multi-kernel programs over named distributed objects.
//!
//! A program declares its arrays (name, size, distribution) and a pipeline of
//! kernels. Dataflow is a chain: the first kernel consumes a program input,
//! every later kernel consumes its immediate predecessor's output. Consuming
//! an object produced further back is rejected, since the task graph only
//! wires adjacent layers.

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::kernel::{CombinerSpec, Kernel};
use crate::signature::SignatureSpec;

/// A named distributed array of `size` values.
#[derive(Clone, Debug)]
pub struct ObjectDecl {
    pub name: String,
    pub size: u64,
    pub distribution: Distribution,
}

impl ObjectDecl {
    pub fn new(name: impl Into<String>, size: u64, distribution: Distribution) -> Self {
        Self {
            name: name.into(),
            size,
            distribution,
        }
    }
}

/// One kernel of the pipeline, referring to objects by name.
#[derive(Clone, Debug)]
pub struct KernelDecl {
    pub name: String,
    pub input: String,
    pub output: String,
    pub signature: SignatureSpec,
    pub combiner: CombinerSpec,
}

/// A validated kernel pipeline.
#[derive(Clone, Debug)]
pub struct Program {
    objects: Vec<ObjectDecl>,
    kernels: Vec<Kernel>,
    /// Per kernel: indices into `objects` of its (input, output).
    kernel_io: Vec<(usize, usize)>,
}

impl Program {
    pub fn new(objects: Vec<ObjectDecl>, kernels: Vec<KernelDecl>) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidProgram(msg);
        if kernels.is_empty() {
            return Err(invalid("a program needs at least one kernel".into()));
        }
        for (k, obj) in objects.iter().enumerate() {
            if objects[..k].iter().any(|o| o.name == obj.name) {
                return Err(invalid(format!("object `{}` is declared twice", obj.name)));
            }
            if let Some(max) = obj.distribution.global_span().max() {
                if max >= obj.size {
                    return Err(invalid(format!(
                        "object `{}`: distribution reaches index {max}, outside [0, {})",
                        obj.name, obj.size
                    )));
                }
            }
        }

        let object_index = |kernel: &str, role: &str, name: &str| -> Result<usize> {
            objects.iter().position(|o| o.name == name).ok_or_else(|| {
                invalid(format!(
                    "kernel `{kernel}`: {role} object `{name}` is not declared"
                ))
            })
        };

        let mut built = Vec::with_capacity(kernels.len());
        let mut kernel_io = Vec::with_capacity(kernels.len());
        for (k, decl) in kernels.iter().enumerate() {
            if kernels[..k].iter().any(|d| d.name == decl.name) {
                return Err(invalid(format!("kernel `{}` is declared twice", decl.name)));
            }
            let input = object_index(&decl.name, "input", &decl.input)?;
            let output = object_index(&decl.name, "output", &decl.output)?;
            if input == output {
                return Err(invalid(format!(
                    "kernel `{}` reads and writes `{}`",
                    decl.name, decl.input
                )));
            }
            if let Some(k_prev) = kernel_io.iter().position(|&(_, out)| out == output) {
                return Err(invalid(format!(
                    "kernel `{}` writes `{}`, already produced by kernel `{}`",
                    decl.name, decl.output, kernels[k_prev].name
                )));
            }
            match k {
                0 => {
                    if kernels.iter().any(|d| d.output == decl.input) {
                        return Err(invalid(format!(
                            "kernel `{}`: input `{}` is produced by a later kernel",
                            decl.name, decl.input
                        )));
                    }
                }
                _ => {
                    if decl.input != kernels[k - 1].output {
                        return Err(invalid(format!(
                            "kernel `{}` consumes `{}`, but only the previous kernel's \
                             output `{}` is live at this step",
                            decl.name,
                            decl.input,
                            kernels[k - 1].output
                        )));
                    }
                }
            }
            let signature = decl.signature.build(objects[input].size)?;
            built.push(Kernel::new(
                decl.name.clone(),
                objects[input].distribution.clone(),
                objects[output].distribution.clone(),
                signature,
                decl.combiner.clone(),
            )?);
            kernel_io.push((input, output));
        }

        Ok(Self {
            objects,
            kernels: built,
            kernel_io,
        })
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn objects(&self) -> &[ObjectDecl] {
        &self.objects
    }

    /// The object the first kernel consumes.
    pub fn input_object(&self) -> &ObjectDecl {
        &self.objects[self.kernel_io[0].0]
    }

    /// The object the last kernel produces.
    pub fn output_object(&self) -> &ObjectDecl {
        &self.objects[self.kernel_io.last().unwrap().1]
    }

    pub fn kernel_input(&self, k: usize) -> &ObjectDecl {
        &self.objects[self.kernel_io[k].0]
    }

    pub fn kernel_output(&self, k: usize) -> &ObjectDecl {
        &self.objects[self.kernel_io[k].1]
    }
}
