#ifndef FPNET_FPNET_H
#define FPNET_FPNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef FPNET_BUILDING
#    define FPNET_API __declspec(dllexport)
#  else
#    define FPNET_API __declspec(dllimport)
#  endif
#else
#  define FPNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpnet_status {
  FPNET_OK = 0,
  FPNET_ERR_DIMENSION = 1,
  FPNET_ERR_OUT_OF_BAND = 2,
  FPNET_ERR_DOMAIN = 3,
  FPNET_ERR_CONFIG = 4,
  FPNET_ERR_IO = 5,
  FPNET_ERR_NON_FINITE = 6,
  FPNET_ERR_INVALID_ARGUMENT = 7,
  FPNET_ERR_INTERNAL = 100
} fpnet_status;

typedef struct fpnet_dataset fpnet_dataset;
typedef struct fpnet_result fpnet_result;

/* Overrides applied on top of config files. */
typedef struct fpnet_options {
  int has_seed;       /* nonzero: `seed` replaces the config seed */
  uint64_t seed;
  int deterministic;  /* -1 keeps the config value, 0 off, 1 fixed reduction order */
  unsigned threads;   /* 0 keeps the config value */
} fpnet_options;

FPNET_API const char* fpnet_version(void);
/* Message of the last failed call on this thread; "" after a success. */
FPNET_API const char* fpnet_last_error(void);
FPNET_API void fpnet_options_init(fpnet_options* options);
/* Frees strings returned through char** out-parameters. */
FPNET_API void fpnet_string_free(char* text);

/* Datasets. `config` is either a JSON file path (…_file) or JSON text
   (…_json, with `source` naming it in error messages). */
FPNET_API fpnet_status fpnet_dataset_simulate_file(const char* config_path, const fpnet_options* options,
                                                   fpnet_dataset** out);
FPNET_API fpnet_status fpnet_dataset_simulate_json(const char* config_text, const char* source,
                                                   const fpnet_options* options, fpnet_dataset** out);
FPNET_API fpnet_status fpnet_dataset_load(const char* dir, fpnet_dataset** out);
FPNET_API fpnet_status fpnet_dataset_save(const fpnet_dataset* dataset, const char* dir);
/* JSON description: kind, mode, count, shapes, optics, provenance. */
FPNET_API fpnet_status fpnet_dataset_info(const fpnet_dataset* dataset, char** json_out);
FPNET_API int fpnet_dataset_equal(const fpnet_dataset* a, const fpnet_dataset* b);
FPNET_API void fpnet_dataset_free(fpnet_dataset* dataset);

/* Reconstruction. `checkpoint_dir` (nullable) receives a checkpoint every
   `checkpoint_every` epochs of the config; `resume_dir` (nullable) continues
   from one. */
FPNET_API fpnet_status fpnet_reconstruct_file(const fpnet_dataset* dataset, const char* config_path,
                                              const fpnet_options* options, const char* checkpoint_dir,
                                              const char* resume_dir, fpnet_result** out);
FPNET_API fpnet_status fpnet_reconstruct_json(const fpnet_dataset* dataset, const char* config_text,
                                              const char* source, const fpnet_options* options,
                                              const char* checkpoint_dir, const char* resume_dir,
                                              fpnet_result** out);
/* Writes amplitude.png, phase.png, object.f32, loss.csv, epochs.csv, summary.json. */
FPNET_API fpnet_status fpnet_result_save(const fpnet_result* result, const char* dir);
FPNET_API fpnet_status fpnet_result_summary(const fpnet_result* result, char** json_out);
FPNET_API fpnet_status fpnet_result_loss_csv(const fpnet_result* result, char** csv_out);
/* Copies the spatial object; call with null buffers to query `side`. */
FPNET_API fpnet_status fpnet_result_object(const fpnet_result* result, double* real, double* imag,
                                           size_t capacity, size_t* side);
FPNET_API void fpnet_result_free(fpnet_result* result);

/* Finite-difference check of one model/loss pair. `corrupt` biases the
   analytic gradient (negative control). `passed` is set against the gate
   tolerance of the loss. */
FPNET_API fpnet_status fpnet_gradcheck(const char* model, const char* loss, size_t size, uint64_t seed,
                                       int corrupt, char** report_json, int* passed);

/* Runs a sweep config over `dataset` and writes CSVs and PNG curves to
   `out_dir`. `summary_json` lists cells and files. */
FPNET_API fpnet_status fpnet_sweep_file(const fpnet_dataset* dataset, const char* config_path,
                                        const fpnet_options* options, const char* out_dir,
                                        char** summary_json);

/* Renders a dataset directory (measurements, ground truth) or a
   reconstruction directory (object.f32) to PNGs in `out_dir`. */
FPNET_API fpnet_status fpnet_render(const char* input_dir, const char* out_dir, char** written_json);
FPNET_API fpnet_status fpnet_fuse_color(const char* red_png, const char* green_png, const char* blue_png,
                                        const char* out_png);

#ifdef __cplusplus
}
#endif

#endif
