#include <fpnet/fpnet.h>

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                          \
    }                                                                      \
  } while (0)

static const char* kSmall =
    "{\n"
    "  \"kind\": \"fp\",\n"
    "  \"seed\": 2,\n"
    "  \"optics\": {\"n_high\": 32, \"stride\": 4},\n"
    "  \"illumination\": {\"grid\": [3, 3], \"step\": 0.05},\n"
    "  \"mode\": \"crop\",\n"
    "  \"noise\": {\"type\": \"poisson\", \"photons\": 1000}\n"
    "}\n";

static const char* kRecon =
    "{\"model\": \"exitwave\", \"loss\": \"l2\", \"optimizer\": {\"kind\": \"adam\", \"lr\": 0.05},\n"
    " \"epochs\": 3, \"order\": \"shuffled\", \"seed\": 4}";

static const char* kRecon0 = "{\"model\": \"intensity\", \"loss\": \"l1\", \"epochs\": 0}";

static int same_file(const char* a, const char* b) {
  FILE* fa = fopen(a, "rb");
  FILE* fb = fopen(b, "rb");
  int same = fa != NULL && fb != NULL;
  while (same) {
    const int ca = fgetc(fa), cb = fgetc(fb);
    if (ca != cb) same = 0;
    if (ca == EOF || cb == EOF) break;
  }
  if (fa) fclose(fa);
  if (fb) fclose(fb);
  return same;
}

static void path(char* out, const char* dir, const char* name) {
  if (strlen(dir) + strlen(name) + 2 > 512) {
    fprintf(stderr, "path too long: %s/%s\n", dir, name);
    exit(2);
  }
  memcpy(out, dir, strlen(dir));
  out[strlen(dir)] = '/';
  strcpy(out + strlen(dir) + 1, name);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    fprintf(stderr, "usage: %s WORK_DIR\n", argv[0]);
    return 2;
  }
  const char* work = argv[1];
  char dir_a[512], dir_b[512], out_a[512], out_b[512], file_a[512], file_b[512];
  path(dir_a, work, "data_a");
  path(dir_b, work, "data_b");
  path(out_a, work, "recon_a");
  path(out_b, work, "recon_b");

  CHECK(strlen(fpnet_version()) > 0);

  fpnet_options opts;
  fpnet_options_init(&opts);
  CHECK(opts.has_seed == 0 && opts.deterministic == -1 && opts.threads == 0);

  /* argument and config errors */
  fpnet_dataset* ds = NULL;
  CHECK(fpnet_dataset_simulate_json(NULL, "x", &opts, &ds) == FPNET_ERR_INVALID_ARGUMENT);
  CHECK(strlen(fpnet_last_error()) > 0);
  CHECK(fpnet_dataset_simulate_json("{\n\"kind\": \"fp\",\n\"bogus\": 1}", "bad.json", &opts, &ds) ==
        FPNET_ERR_CONFIG);
  CHECK(strstr(fpnet_last_error(), "bad.json:3") != NULL);
  CHECK(fpnet_dataset_simulate_json("{\"optics\": {\"n_high\": 30, \"stride\": 4}}", "odd.json", &opts, &ds) ==
        FPNET_ERR_CONFIG);
  CHECK(ds == NULL);
  CHECK(fpnet_dataset_load("/nonexistent/fpnet", &ds) == FPNET_ERR_IO);

  /* simulate, save, load */
  CHECK(fpnet_dataset_simulate_json(kSmall, "small.json", &opts, &ds) == FPNET_OK);
  CHECK(strlen(fpnet_last_error()) == 0);
  CHECK(fpnet_dataset_save(ds, dir_a) == FPNET_OK);
  fpnet_dataset* again = NULL;
  CHECK(fpnet_dataset_simulate_json(kSmall, "small.json", &opts, &again) == FPNET_OK);
  CHECK(fpnet_dataset_save(again, dir_b) == FPNET_OK);
  path(file_a, dir_a, "manifest.json");
  path(file_b, dir_b, "manifest.json");
  CHECK(same_file(file_a, file_b));
  fpnet_dataset* loaded = NULL;
  CHECK(fpnet_dataset_load(dir_a, &loaded) == FPNET_OK);
  CHECK(fpnet_dataset_equal(ds, loaded) == 1);

  opts.has_seed = 1;
  opts.seed = 99;
  fpnet_dataset* reseeded = NULL;
  CHECK(fpnet_dataset_simulate_json(kSmall, "small.json", &opts, &reseeded) == FPNET_OK);
  CHECK(fpnet_dataset_equal(ds, reseeded) == 0);
  fpnet_dataset_free(reseeded);
  opts.has_seed = 0;

  char* info = NULL;
  CHECK(fpnet_dataset_info(ds, &info) == FPNET_OK);
  CHECK(info != NULL && strstr(info, "\"count\": 9") != NULL);
  fpnet_string_free(info);

  /* zero epochs: loss table is empty, object has the high-resolution side */
  fpnet_result* r0 = NULL;
  CHECK(fpnet_reconstruct_json(ds, kRecon0, "r0.json", &opts, NULL, NULL, &r0) == FPNET_OK);
  char* csv = NULL;
  CHECK(fpnet_result_loss_csv(r0, &csv) == FPNET_OK);
  CHECK(csv != NULL && strcmp(csv, "update_index,epoch,loss,rel_error\n") == 0);
  fpnet_string_free(csv);
  size_t side = 0;
  CHECK(fpnet_result_object(r0, NULL, NULL, 0, &side) == FPNET_OK);
  CHECK(side == 32);
  double small_buf[4];
  CHECK(fpnet_result_object(r0, small_buf, small_buf, 4, &side) == FPNET_ERR_DIMENSION);
  fpnet_result_free(r0);

  /* determinism */
  opts.deterministic = 1;
  opts.has_seed = 1;
  opts.seed = 7;
  fpnet_result* ra = NULL;
  fpnet_result* rb = NULL;
  CHECK(fpnet_reconstruct_json(loaded, kRecon, "r.json", &opts, NULL, NULL, &ra) == FPNET_OK);
  CHECK(fpnet_reconstruct_json(loaded, kRecon, "r.json", &opts, NULL, NULL, &rb) == FPNET_OK);
  CHECK(fpnet_result_save(ra, out_a) == FPNET_OK);
  CHECK(fpnet_result_save(rb, out_b) == FPNET_OK);
  const char* outputs[] = {"loss.csv", "object.f32", "summary.json", "epochs.csv", "phase.png"};
  for (size_t i = 0; i < sizeof outputs / sizeof outputs[0]; ++i) {
    path(file_a, out_a, outputs[i]);
    path(file_b, out_b, outputs[i]);
    CHECK(same_file(file_a, file_b));
  }
  double* re = malloc(32 * 32 * sizeof(double));
  double* im = malloc(32 * 32 * sizeof(double));
  CHECK(fpnet_result_object(ra, re, im, 32 * 32, &side) == FPNET_OK);
  int finite = 1;
  for (size_t i = 0; i < 32 * 32; ++i)
    if (!(re[i] == re[i]) || !(im[i] == im[i])) finite = 0;
  CHECK(finite);
  free(re);
  free(im);
  char* summary = NULL;
  CHECK(fpnet_result_summary(ra, &summary) == FPNET_OK);
  CHECK(summary != NULL && strstr(summary, "phase [-pi, pi]") != NULL);
  fpnet_string_free(summary);
  fpnet_result_free(ra);
  fpnet_result_free(rb);

  /* incompatible model */
  fpnet_result* bad = NULL;
  CHECK(fpnet_reconstruct_json(ds, "{\"model\": \"spi\", \"loss\": \"l2\"}", "spi.json", &opts, NULL, NULL,
                               &bad) == FPNET_ERR_CONFIG);
  CHECK(bad == NULL);

  /* gradient check */
  char* report = NULL;
  int passed = 0;
  CHECK(fpnet_gradcheck("sim", "l2", 8, 3, 0, &report, &passed) == FPNET_OK);
  CHECK(passed == 1);
  fpnet_string_free(report);
  CHECK(fpnet_gradcheck("intensity", "l2", 8, 3, 1, &report, &passed) == FPNET_OK);
  CHECK(passed == 0);
  fpnet_string_free(report);
  CHECK(fpnet_gradcheck("nonsense", "l2", 8, 3, 0, &report, &passed) != FPNET_OK);

  /* rendering */
  char render_dir[512], written_path[512];
  path(render_dir, work, "render");
  char* written = NULL;
  CHECK(fpnet_render(dir_a, render_dir, &written) == FPNET_OK);
  CHECK(written != NULL && strstr(written, "measurement_0008.png") != NULL);
  fpnet_string_free(written);
  path(written_path, render_dir, "fused.png");
  path(file_a, render_dir, "measurement_0000.png");
  path(file_b, render_dir, "measurement_0001.png");
  CHECK(fpnet_fuse_color(file_a, file_b, file_a, written_path) == FPNET_OK);

  fpnet_dataset_free(ds);
  fpnet_dataset_free(again);
  fpnet_dataset_free(loaded);
  fpnet_dataset_free(NULL);
  fpnet_result_free(NULL);

  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  else printf("all C API checks passed\n");
  return failures ? 1 : 0;
}
