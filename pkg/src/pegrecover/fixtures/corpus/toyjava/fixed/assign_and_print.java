public class Main {
  public static void main(String[] args) {
    int s = 0;
    s = 5;
    System.out.println(s);
  }
}
